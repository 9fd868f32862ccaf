"""
Validation of command-line arguments.

Every subcommand binds its options to one of these forms before touching
any file; an invalid form aborts the command with exit status 2.
"""
from django import forms

from codec.params import CodecParams
from stego_video.modes import EmbedMode

KEY_HEX_LENGTHS = (32, 48, 64)
NONCE_HEX_LENGTH = 32


def _hex_bytes(value, lengths, what):
    value = value.strip().lower()
    if value.startswith('0x'):
        value = value[2:]
    if len(value) not in lengths:
        raise forms.ValidationError(
            f'{what} must be {" or ".join(str(n) for n in lengths)} hex digits, got {len(value)}'
        )
    try:
        return bytes.fromhex(value)
    except ValueError:
        raise forms.ValidationError(f'{what} is not valid hex')


class CodecOptionsForm(forms.Form):
    gop = forms.IntegerField(required=False, min_value=1, max_value=255)
    qp = forms.IntegerField(required=False, min_value=1, max_value=63)
    search = forms.IntegerField(required=False, min_value=0, max_value=64)

    def params(self):
        return CodecParams.from_settings(
            gop_size=self.cleaned_data.get('gop'),
            qp=self.cleaned_data.get('qp'),
            search_range=self.cleaned_data.get('search'),
        )


class KeyForm(forms.Form):
    key = forms.CharField(required=False)
    nonce = forms.CharField(required=False)

    def clean_key(self):
        key = self.cleaned_data.get('key')
        return _hex_bytes(key, KEY_HEX_LENGTHS, 'key') if key else None

    def clean_nonce(self):
        nonce = self.cleaned_data.get('nonce')
        return _hex_bytes(nonce, (NONCE_HEX_LENGTH,), 'nonce') if nonce else None

    def clean(self):
        cleaned = super().clean()
        if cleaned.get('nonce') and not cleaned.get('key') and not self.errors.get('key'):
            raise forms.ValidationError('a nonce is only meaningful together with a key')
        return cleaned


class EmbedForm(CodecOptionsForm, KeyForm):
    mode = forms.ChoiceField(choices=[(label, label) for label in EmbedMode.labels])

    def clean_mode(self):
        return EmbedMode.from_label(self.cleaned_data['mode'])


class CapacityForm(CodecOptionsForm):
    mode = forms.ChoiceField(choices=[(label, label) for label in EmbedMode.labels])

    def clean_mode(self):
        return EmbedMode.from_label(self.cleaned_data['mode'])


class EmbedCoeffForm(CodecOptionsForm, KeyForm):
    bits = forms.IntegerField(required=False, min_value=1, initial=1000)
    seed = forms.IntegerField(required=False, min_value=0)


class SynthForm(forms.Form):
    width = forms.IntegerField(min_value=1, max_value=65535)
    height = forms.IntegerField(min_value=1, max_value=65535)
    frames = forms.IntegerField(min_value=1)
    noise = forms.IntegerField(required=False, min_value=0, max_value=127)
    seed = forms.IntegerField(required=False, min_value=0)


class FrameSizeForm(forms.Form):
    width = forms.IntegerField(min_value=1)
    height = forms.IntegerField(min_value=1)


class SnapshotForm(forms.Form):
    frame = forms.IntegerField(min_value=0)


class CalibrationForm(forms.Form):
    trials = forms.IntegerField(required=False, min_value=1)
    seed = forms.IntegerField(required=False, min_value=0)


def form_errors(form):
    """Flatten form errors into one diagnostic line."""
    parts = []
    for field, errors in form.errors.items():
        prefix = '' if field == '__all__' else f'--{field}: '
        parts.extend(prefix + str(error) for error in errors)
    return '; '.join(parts)
