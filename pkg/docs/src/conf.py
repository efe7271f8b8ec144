# Configuration for the Sphinx documentation builder.
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys

import toml

sys.path.insert(0, os.path.abspath("../.."))


def get_release_version() -> str:
    """Get the release version from the pyproject.toml file.

    :return:
    """
    project_content = toml.load("../../pyproject.toml")
    return project_content["project"]["version"]


# Project
project = "deltadrift"
copyright = "2026 deltadrift contributors"
version = get_release_version()


# General

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
]

autodoc_typehints = "description"
autodoc_member_order = "bysource"

templates_path = ["_templates"]

exclude_patterns = []

# Keep signatures short, module names appear in the section titles.
add_module_names = False

# HTML output

html_theme = "sphinx_rtd_theme"

html_static_path = []

html_show_sourcelink = False

html_show_sphinx = False
