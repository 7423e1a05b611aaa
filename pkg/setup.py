from setuptools import find_packages, setup

setup(
    name="bipartite-tfidf",
    version="0.1.0",
    description="User-object network analysis: tf-idf edge filtering, projections, Louvain, degree fits",
    packages=find_packages(include=["agent", "agent.*", "config", "core", "data", "logs"]),
    py_modules=["run"],
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.26",
        "scipy>=1.11",
        "pydantic>=2.5",
        "python-dotenv>=1.0",
        "rich>=13",
    ],
    extras_require={"test": ["pytest>=7", "networkx>=3"]},
    entry_points={"console_scripts": ["bipartite=run:main"]},
)
