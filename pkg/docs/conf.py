"""Sphinx configuration."""

# -- Project information -----------------------------------------------------

project = "dialectica"
author = "Dialectica developers"
copyright = f"2026, {author}"  # noqa: A001

# The full version, including alpha/beta/rc tags
release = "0.1.0"

# -- General configuration ------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
]
exclude_patterns = ["_build"]
autodoc_typehints = "description"
autodoc_member_order = "bysource"

# -- Options for HTML output -------------------------------------------------

html_theme = "furo"
html_theme_options = {
    "light_css_variables": {
        "color-brand-primary": "#2E5E4E",
        "color-brand-content": "#2E5E4E",
    },
    "dark_css_variables": {
        "color-brand-primary": "#8BC6A8",
        "color-brand-content": "#8BC6A8",
    },
}
