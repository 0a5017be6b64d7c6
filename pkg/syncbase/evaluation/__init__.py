"""Head-to-head evaluation of learned and expert estimators."""
