#!/usr/bin/env python3
from .cli import main

main()
