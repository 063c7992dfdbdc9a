import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'betalab.settings')
django.setup()
