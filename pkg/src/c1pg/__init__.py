"""C1-conforming Petrov-Galerkin method for 2D convection-diffusion on
rectangular tensor meshes, with superconvergence error studies."""

__version__ = "0.1.0"
