from .display import Display
