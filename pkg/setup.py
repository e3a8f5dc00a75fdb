from setuptools import find_packages, setup

setup(
    description="pycyclic",
    license="EUPL",
    include_package_data=True,
    packages=find_packages(exclude=["tests"]),
    zip_safe=False,
    install_requires=["loguru", "pyyaml"],
    entry_points={"console_scripts": ["pycyclic=pycyclic.cli:main"]},
)
