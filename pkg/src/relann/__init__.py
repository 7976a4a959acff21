"""Ontology-grounded semantic relation annotation toolkit.

Provides a typed relation inventory (a DOLCE-derived subset plus custom
relations with domain/range signatures), lemma-to-class alignment, corpus
ingestion with glossary-constrained pair sampling, annotation records with
direct/composite/unclassified assignments, aggregate statistics, and a local
HTTP service plus CLI that drive the annotation workflow.
"""

__version__ = "0.1.0"
