from setuptools import setup

setup(name='gmequiv',
      version='0.1.0',
      description='Numerical diagnostics for the asymptotic equivalence of regression '
                  'under Gauss-Markov noise',
      license='GNU GPLv3',
      packages=['gmequiv'],
      python_requires='>=3.8',
      install_requires=[
          'numpy>=1.17',
          'scipy>=1.4',
          'PyYAML>=5.1',
          'simplejson',
      ],
      entry_points={
          'console_scripts': ['gmequiv = gmequiv.cli:main'],
      },
  )
