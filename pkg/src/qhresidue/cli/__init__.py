"""Command-line front end: manifests, reports and the ``qhresidue`` command."""
