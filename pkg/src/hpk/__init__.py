"""Persistent programming kernel with run-time reflection.

The package is organised as a small language core (lang), structural type
representations (typerep), hyper-program sources (hyperprog), the run-time
compiler front (kernel), program generators (generator, genlib, join), an
object store (store), and a headless workbench (workbench).
"""

__all__ = ["kernel", "typerep", "hyperprog", "store", "generator", "genlib"]
