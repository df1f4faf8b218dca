from setuptools import setup, find_packages

setup(
    name='mg_secrecy',
    version='0.1.0',
    description='Secrecy rate and outage of square M-QAM over mixture-Gamma fading channels',
    packages=find_packages(include=['mg_secrecy']),
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.20',
        'scipy>=1.7',
        'pydantic>=2',
    ],
    extras_require={
        'tests': ['pytest', 'hypothesis'],
    },
    entry_points={
        'console_scripts': ['mg-secrecy=mg_secrecy.cli:main'],
    },
)
