"""gazekit: desk-scale gaze estimation pipeline.

Camera-space face normalization, masked-autoencoder pre-training of a small
vision transformer, gaze regression fine-tuning, procedural toy datasets, and
multi-dataset evaluation protocols, all on top of a self-contained
reverse-mode autodiff engine.
"""

__version__ = "0.1.0"
