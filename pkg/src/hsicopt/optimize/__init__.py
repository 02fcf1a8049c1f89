"""Screening, reduction, the derivative-free optimizer and the study harness."""
from .dfo import StudyRecord, dfo_minimize, trust_region_step
from .screening import Screening, classify, classify_indices, freeze_values, reduce
from .study import basin_frequency, run_study, summarize, write_records_csv
