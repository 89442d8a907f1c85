#!/usr/bin/env python
import os
import sys

import django

# Configurar Django
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'mkleene_lab.settings')
django.setup()

from kleene_lab.cli import main  # noqa: E402

if __name__ == '__main__':
    sys.exit(main())
