#!/usr/bin/env python3
"""
Curve Shortening Flow Checker

This script provides a simple entry point to the csf_checker package.
For the actual implementation, see the package modules:
- csf_checker.flow: flow integrator and trajectory diagnostics
- csf_checker.checker: curve and trajectory checks
- csf_checker.corpus: seeded curve generators
- csf_checker.reporter: Report generation (JSON, Markdown, CSV, SVG)
"""

import sys

# Import and run the main function from the package
from csf_checker.__main__ import main

if __name__ == "__main__":
    sys.exit(main())
