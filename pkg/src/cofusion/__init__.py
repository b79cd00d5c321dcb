"""cofusion: region-perception driven multi-exposure and IR-visible co-fusion."""

__version__ = "0.1.0"
