from .listeners import CsvListener, SummaryListener, SweepListener

__all__ = ("CsvListener", "SummaryListener", "SweepListener")
