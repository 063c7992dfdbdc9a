from rest_framework import serializers

from .conf import DEFAULTS

FORMATS = ['csv', 'svg', 'json']


class BetaListField(serializers.ListField):
    """Accepts a single number as a one-element list."""

    def to_internal_value(self, data):
        if isinstance(data, (int, float, str)):
            data = [data]
        return super().to_internal_value(data)


class RunConfigSerializer(serializers.Serializer):
    """Validated run configuration shared by the commands and the HTTP views"""
    beta = BetaListField(child=serializers.FloatField(min_value=0.0), min_length=1, required=False)
    c1 = serializers.FloatField(required=False)
    c2 = serializers.FloatField(required=False)
    eps = serializers.FloatField(min_value=0.0, required=False)
    r_max = serializers.FloatField(required=False)
    samples = serializers.IntegerField(min_value=9, required=False)
    f0 = serializers.FloatField(required=False)
    g0 = serializers.FloatField(required=False)
    output = serializers.CharField(required=False, allow_blank=True)
    format = serializers.ChoiceField(choices=FORMATS, required=False)
    seed = serializers.IntegerField(min_value=0, required=False)
    tolerances = serializers.DictField(child=serializers.FloatField(), required=False)

    # verify
    corrupt_slope = serializers.FloatField(required=False)

    # variation
    field_count = serializers.IntegerField(min_value=1, max_value=200, required=False)
    slope_scale = serializers.FloatField(required=False)
    n_r = serializers.IntegerField(min_value=9, required=False)
    n_theta = serializers.IntegerField(min_value=4, required=False)

    # symbol
    directions = serializers.IntegerField(min_value=1, required=False)
    points = serializers.IntegerField(min_value=1, required=False)

    def validate(self, data):
        unknown = sorted(set(self.initial_data) - set(self.fields))
        if unknown:
            raise serializers.ValidationError({key: 'Unknown configuration key.' for key in unknown})

        eps, r_max = data.get('eps'), data.get('r_max')
        if eps is not None and eps <= 0:
            raise serializers.ValidationError({'eps': 'eps must be positive.'})
        if eps is not None and r_max is not None and not eps < r_max:
            raise serializers.ValidationError({'r_max': 'r_max must exceed eps.'})

        betas = data.get('beta')
        if betas and any(later <= earlier for earlier, later in zip(betas, betas[1:])):
            raise serializers.ValidationError({'beta': 'beta values must be strictly increasing.'})

        tolerances = data.get('tolerances') or {}
        unknown_tolerances = sorted(set(tolerances) - set(DEFAULTS))
        if unknown_tolerances:
            raise serializers.ValidationError({'tolerances': f"Unknown tolerance(s): {', '.join(unknown_tolerances)}"})
        return data
