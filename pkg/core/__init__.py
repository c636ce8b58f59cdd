"""Core data models, embedding pipeline and evaluation logic for fracstego."""
