from setuptools import setup, find_packages, Command


class RunTests(Command):
  user_options = []

  def initialize_options(self):
    pass

  def finalize_options(self):
    pass

  def run(self):
    import sys, subprocess
    errno = subprocess.call([sys.executable, '-m', 'pytest', 'tests'])
    raise SystemExit(errno)


setup(
    name='ampleangles',
    version='0.1.0',
    description='exact bodies of ample angles and tail blow-up classification for log surfaces',
    license='MIT',
    packages=find_packages(exclude=['tests']),
    install_requires=['click', 'pycddlib>=2.1,<3', 'sympy'],
    extras_require={'test': ['pytest']},
    python_requires='>=3.9',
    zip_safe=True,
    cmdclass={'test': RunTests},
    entry_points = {
        'console_scripts': [
            'ampleangles = ampleangles.bin.aa:cli'
        ]
    }
)
