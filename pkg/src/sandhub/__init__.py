"""sandhub: an application-distribution hub whose applications run on the
user's machine, with passphrase-sealed result sharing and a native benchmark
harness."""

__version__ = "0.1.0"
