# groups/__init__.py
# Deixa o diretório 'groups' como pacote Python.
# Importe de groups.catalog / groups.base diretamente (evita import circular com lib.cayley).
