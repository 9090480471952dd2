"""
Validation of run manifests.

Provides:
- RunManifestSerializer: checks a manifest.json document and that its
  config hash matches the config it stores.
"""

# 1. Standard library
from datetime import timezone

# 2. Third-party
from rest_framework import serializers

# 3. Local imports
from app_ppo.api.serializers import build_train_config


class RunManifestSerializer(serializers.Serializer):
    """
    Serializer for the manifest written into every run directory.

    The stored config is validated again and rehashed; a manifest whose
    hash does not match its config is rejected.
    """
    config = serializers.DictField()
    seed = serializers.IntegerField()
    config_hash = serializers.RegexField(r'^[0-9a-f]{64}$')
    started_at = serializers.DateTimeField(default_timezone=timezone.utc)
    finished_at = serializers.DateTimeField(default_timezone=timezone.utc, allow_null=True, required=False, default=None)
    artifacts = serializers.ListField(child=serializers.CharField(), default=list)

    def validate(self, attrs):
        try:
            config = build_train_config(attrs['config'])
        except serializers.ValidationError as exc:
            raise serializers.ValidationError({'config': exc.detail}) from exc
        if config.config_hash() != attrs['config_hash']:
            raise serializers.ValidationError({'config_hash': 'Hash does not match the stored config.'})
        if config.seed != attrs['seed']:
            raise serializers.ValidationError({'seed': 'Seed does not match the stored config.'})
        attrs['train_config'] = config
        return attrs
