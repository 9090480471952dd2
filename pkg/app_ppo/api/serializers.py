"""
Validation of run configuration files.

Features:
- StrictSerializer: rejects keys it does not declare and reports them together
  with every field error.
- One serializer per config namespace and TrainConfigSerializer for the whole
  run, including the cross-field rules between mode, clusters and coefficients.
- build_train_config: flat dotted mapping -> frozen TrainConfig.
"""

# 1. Standard library
from collections.abc import Mapping

# 2. Third-party
from rest_framework import serializers
from rest_framework.fields import empty

# 3. Local imports
from app_dve.config import BOOST_MODES
from app_envs.registry import ENVIRONMENTS
from app_ppo.config import (
    MODES, DVEConfig, EnvConfig, EvalConfig, NetConfig, PPOConfig, RunConfig, TrainConfig, fold_flat_mapping)


PRE_BOOST_COEFFICIENT = 0.05
POST_BOOST_COEFFICIENT = 0.5
PRETRAIN_FRACTION = 0.4


class IntegerListField(serializers.Field):
    """Accepts a list of integers or a comma separated string of them."""

    default_error_messages = {'invalid': 'Expected integers separated by commas.'}

    def to_internal_value(self, data):
        if isinstance(data, str):
            data = [part for part in data.replace(' ', '').split(',') if part]
        if not isinstance(data, (list, tuple)):
            self.fail('invalid')
        try:
            return tuple(int(item) for item in data)
        except (TypeError, ValueError):
            self.fail('invalid')

    def to_representation(self, value):
        return list(value)


class StrictSerializer(serializers.Serializer):
    """
    Serializer that treats undeclared keys as errors.

    Unknown keys and field errors end up in the same error dictionary, so a
    config file with several problems reports all of them at once.
    """

    def to_internal_value(self, data):
        errors = {}
        if isinstance(data, Mapping):
            for key in sorted(set(data) - set(self.fields)):
                errors[key] = ['Unknown key.']
        try:
            value = super().to_internal_value(data)
        except serializers.ValidationError as exc:
            detail = exc.detail if isinstance(exc.detail, Mapping) else {'non_field_errors': exc.detail}
            errors.update(detail)
            value = None
        if errors:
            raise serializers.ValidationError(errors)
        return value


def salvage_values(serializer, data):
    """
    Best-effort values of a serializer tree: every entry that validates on
    its own, the field default for the rest.
    """
    values = {}
    for name, field in serializer.fields.items():
        raw = data.get(name, empty) if isinstance(data, Mapping) else empty
        if isinstance(field, serializers.Serializer):
            values[name] = salvage_values(field, raw)
            continue
        try:
            values[name] = field.run_validation(raw) if raw is not empty else field.get_default()
        except serializers.ValidationError:
            values[name] = field.get_default()
    return values


class EnvSerializer(StrictSerializer):
    name = serializers.ChoiceField(choices=sorted(ENVIRONMENTS), default='corridor-coin')
    levels = serializers.IntegerField(min_value=1, default=500)
    level_base_seed = serializers.IntegerField(min_value=0, default=1000)
    level_seeds = IntegerListField(required=False, default=())
    chain_length = serializers.IntegerField(min_value=1, default=8)


class PPOSerializer(StrictSerializer):
    gamma = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.99)
    lam = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.95)
    clip = serializers.FloatField(min_value=0.0, default=0.2)
    entropy_coef = serializers.FloatField(min_value=0.0, default=0.01)
    value_coef = serializers.FloatField(min_value=0.0, default=0.5)
    lr = serializers.FloatField(min_value=0.0, default=5e-4)
    max_grad_norm = serializers.FloatField(min_value=0.0, default=0.5)
    workers = serializers.IntegerField(min_value=1, default=4)
    segment_length = serializers.IntegerField(min_value=1, default=128)
    chunk_length = serializers.IntegerField(min_value=0, default=0)
    epochs = serializers.IntegerField(min_value=1, default=4)
    minibatches = serializers.IntegerField(min_value=1, default=4)
    total_steps = serializers.IntegerField(min_value=1, default=200000)
    precision = serializers.ChoiceField(choices=['float64', 'float32'], default='float64')


class NetSerializer(StrictSerializer):
    hidden = serializers.IntegerField(min_value=1, default=64)


class DVESerializer(StrictSerializer):
    """
    Mode-dependent defaults (coefficients, cluster count, pretraining length)
    are left as None here and resolved by TrainConfigSerializer.
    """
    n_clusters = serializers.IntegerField(min_value=1, max_value=8, required=False, allow_null=True, default=None)
    k1 = serializers.FloatField(min_value=0.0, required=False, allow_null=True, default=None)
    k2 = serializers.FloatField(min_value=0.0, required=False, allow_null=True, default=None)
    eps_log = serializers.FloatField(min_value=0.0, default=1e-8)
    boost = serializers.ChoiceField(choices=list(BOOST_MODES), default='pre')
    ramp_fraction = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.25)
    window = serializers.IntegerField(min_value=2, default=8)
    slope_threshold = serializers.FloatField(default=0.05)
    min_pretrain_steps = serializers.IntegerField(min_value=0, required=False, allow_null=True, default=None)
    cc_assignments_only = serializers.BooleanField(default=True)


class EvalSerializer(StrictSerializer):
    interval = serializers.IntegerField(min_value=1, default=5)
    episodes = serializers.IntegerField(min_value=0, default=16)
    levels = serializers.IntegerField(min_value=1, default=50)
    level_base_seed = serializers.IntegerField(min_value=0, default=900000)


class RunSerializer(StrictSerializer):
    checkpoint_interval = serializers.IntegerField(min_value=1, default=25)
    dump_episodes = serializers.IntegerField(min_value=0, default=4)


class TrainConfigSerializer(StrictSerializer):
    """
    Validates a nested run configuration and builds the TrainConfig.

    Cross-field rules:
    - rl2 uses a single cluster and no sparsity loss.
    - dve uses no sparsity loss.
    - sparse-dve needs gamma < 1.
    - chunk_length divides segment_length and minibatches divides the
      number of recurrent chunks per update.
    """
    mode = serializers.ChoiceField(choices=list(MODES), default='sparse-dve')
    seed = serializers.IntegerField(min_value=0, default=0)
    env = EnvSerializer()
    ppo = PPOSerializer()
    net = NetSerializer()
    dve = DVESerializer()
    eval = EvalSerializer()
    run = RunSerializer()

    def to_internal_value(self, data):
        """
        Field errors do not hide rule violations: when a field fails, the
        cross-field rules still run on the values that did validate (defaults
        elsewhere) and their errors join the same dictionary.
        """
        try:
            return super().to_internal_value(data)
        except serializers.ValidationError as exc:
            errors = dict(exc.detail)
            for key, messages in self.rule_errors(salvage_values(self, data)).items():
                errors.setdefault(key, messages)
            raise serializers.ValidationError(errors) from exc

    def validate(self, attrs):
        errors = self.rule_errors(attrs)
        if errors:
            raise serializers.ValidationError(errors)
        return attrs

    def rule_errors(self, attrs):
        """
        Resolve mode-dependent defaults in place and check the cross-field rules.

        Returns:
            dict: Dotted key -> messages for every violated rule.
        """
        errors = {}
        mode = attrs['mode']
        ppo, dve = attrs['ppo'], attrs['dve']

        if mode == 'rl2':
            if dve['n_clusters'] not in (None, 1):
                errors['dve.n_clusters'] = ['rl2 uses a single value head; n_clusters must be 1.']
            dve['n_clusters'] = 1
        elif dve['n_clusters'] is None:
            dve['n_clusters'] = 3

        if mode in ('rl2', 'dve'):
            for key in ('k1', 'k2'):
                if dve[key] not in (None, 0.0):
                    errors[f'dve.{key}'] = [f'{mode} trains without the sparsity loss; {key} must be 0.']
                dve[key] = 0.0
        else:
            default = PRE_BOOST_COEFFICIENT if dve['boost'] == 'pre' else POST_BOOST_COEFFICIENT
            for key in ('k1', 'k2'):
                if dve[key] is None:
                    dve[key] = default
            if ppo['gamma'] >= 1.0:
                errors['ppo.gamma'] = ['sparse-dve needs a discount below 1.']

        if dve['min_pretrain_steps'] is None:
            dve['min_pretrain_steps'] = int(PRETRAIN_FRACTION * ppo['total_steps'])

        chunk = ppo['chunk_length'] or ppo['segment_length']
        if ppo['segment_length'] % chunk:
            errors['ppo.chunk_length'] = ['chunk_length must divide segment_length.']
        else:
            chunks = ppo['workers'] * (ppo['segment_length'] // chunk)
            if chunks % ppo['minibatches']:
                errors['ppo.minibatches'] = [f'minibatches must divide the {chunks} recurrent chunks per update.']
        return errors

    def create(self, validated_data):
        return TrainConfig(
            mode=validated_data['mode'],
            seed=validated_data['seed'],
            env=EnvConfig(**validated_data['env']),
            ppo=PPOConfig(**validated_data['ppo']),
            net=NetConfig(**validated_data['net']),
            dve=DVEConfig(**validated_data['dve']),
            eval=EvalConfig(**validated_data['eval']),
            run=RunConfig(**validated_data['run']),
        )


def build_train_config(flat=None):
    """
    Validate a flat dotted mapping and return the frozen TrainConfig.

    Raises:
        serializers.ValidationError: With the complete error dictionary.
    """
    serializer = TrainConfigSerializer(data=fold_flat_mapping(flat or {}))
    serializer.is_valid(raise_exception=True)
    return serializer.save()
