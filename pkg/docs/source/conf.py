"""Sphinx configuration for pydevelop-community."""

import os
import sys

# Path setup
sys.path.insert(0, os.path.abspath("../../src"))

from pydevelop.community import __version__

project = "pydevelop-community"
author = "PyDevelop Team"
release = __version__

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "sphinx.ext.viewcode",
    "myst_parser",
]

source_suffix = {".rst": "restructuredtext", ".md": "markdown"}
autodoc_member_order = "bysource"
napoleon_google_docstring = True

html_theme = "furo"
html_title = "pydevelop-community"
html_theme_options = {
    "sidebar_hide_name": False,
    "navigation_with_keys": True,
}
