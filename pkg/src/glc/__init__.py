"""Graph-like continua as inverse systems of finite multigraphs."""

__version__ = "0.1.0"
