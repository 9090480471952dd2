class AnalysisError(ValueError):
    """Inputs of an analysis are missing, inconsistent or of the wrong kind."""
