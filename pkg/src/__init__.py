# MultiNet: multilayer network embedding and clustering
__version__ = "1.0.0"
