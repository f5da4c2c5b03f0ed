# -*- coding: utf-8 -*-
#
# onoffPRIVACY documentation build configuration file
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os

# If extensions (or modules to document with autodoc) are in another directory,
# add these directories to sys.path here.
sys.path.insert(0, os.path.abspath('../..'))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.todo',
    'sphinx.ext.coverage',
    'sphinx.ext.imgmath',
    'sphinx.ext.ifconfig',
    'sphinx.ext.viewcode',
]

autodoc_default_flags = ['private-members', 'special-members']

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'onoffPRIVACY'
copyright = '2026, onoffPRIVACY developers'

# The short X.Y version.
version = '1.0'
# The full version, including alpha/beta/rc tags.
release = '1.0.0'

exclude_patterns = []
pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
html_sidebars = {
    'index': ['globaltoc.html', 'searchbox.html'],
    '**': ['localtoc.html', 'relations.html', 'searchbox.html']
}
htmlhelp_basename = 'onoffPRIVACYdoc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {
}

latex_documents = [
  ('index', 'onoffPRIVACY.tex', 'onoffPRIVACY Documentation',
   'onoffPRIVACY developers', 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    ('index', 'onoffPRIVACY', 'onoffPRIVACY Documentation',
     ['onoffPRIVACY developers'], 1)
]

# Example configuration for intersphinx: refer to the Python standard library.
intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
}
