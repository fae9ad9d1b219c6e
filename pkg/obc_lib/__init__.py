from .app import main, run
