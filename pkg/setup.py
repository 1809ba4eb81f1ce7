from setuptools import setup, find_packages

setup(
    name="extractor",
    version="0.1",
    packages=find_packages(exclude=['tests', 'tests.*']),
    install_requires=[
        'numpy',
        'pandas',
        'matplotlib',
        'torch',
        'scikit-learn',
        'tqdm',
    ],
    extras_require={
        'pretrained': ['transformers'],
        'test': ['pytest'],
    },
    entry_points={
        'console_scripts': ['extractor=extractor.main:main'],
    },
)
