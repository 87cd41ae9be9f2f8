from setuptools import setup, find_packages

setup(
    name="qbirdpe",
    use_scm_version=True,
    setup_requires=["setuptools_scm"],
    description="Quantum-walk Metropolis sampler with renormalization for gravitational-wave parameter estimation",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    packages=find_packages(include=["qbirdpe", "qbirdpe.*"]),
    package_data={"qbirdpe.tests.test_data": ["*.csv"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.9",
    install_requires=["numpy", "pydantic>=2", "omegaconf"],
    extras_require={"test": ["pytest"]},
    entry_points={"console_scripts": ["qbirdpe=qbirdpe.cli.main:main"]},
)
