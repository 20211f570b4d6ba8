# -*- coding: utf-8 -*-
#
# gmequiv documentation build configuration file.

import os
import sys

sys.path.insert(0, os.path.abspath('..'))

import gmequiv

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'gmequiv'
copyright = u'2026, the gmequiv authors'

version = gmequiv.__version__
release = gmequiv.__version__

exclude_patterns = ['_build']
pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

html_theme = 'default'
html_static_path = []
htmlhelp_basename = 'gmequivdoc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {
}

latex_documents = [
  ('index', 'gmequiv.tex', u'gmequiv Documentation',
   u'the gmequiv authors', 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    ('index', 'gmequiv', u'gmequiv Documentation',
     [u'the gmequiv authors'], 1)
]
