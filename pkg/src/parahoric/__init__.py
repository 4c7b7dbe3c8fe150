"""Exact verifier for Hecke algebra and coefficient system identities of
GL_n over a local function field."""

__version__ = "0.1.0"
