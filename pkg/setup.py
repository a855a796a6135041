#!/usr/bin/env python3
"""
Setup and validation script for henselcells
"""

import sys
from pathlib import Path


def check_python_version():
    """Check if Python version is compatible"""
    if sys.version_info < (3, 9):
        print("❌ Python 3.9 or higher is required")
        print(f"   Current version: {sys.version}")
        return False
    print(f"✅ Python version: {sys.version.split()[0]}")
    return True


def check_dependencies():
    """Check if required packages are installed"""
    required_packages = {
        'numpy': 'numpy',
        'sympy': 'sympy',
        'python-dotenv': 'dotenv',
        'pytest': 'pytest',
        'hypothesis': 'hypothesis',
    }

    missing_packages = []
    for package, module in required_packages.items():
        try:
            __import__(module)
            print(f"✅ {package}")
        except ImportError:
            print(f"❌ {package}")
            missing_packages.append(package)

    if missing_packages:
        print("\n💡 Install missing packages with:")
        print(f"   pip install {' '.join(missing_packages)}")
        return False
    return True


def check_env_file():
    """The .env file is optional; it may only set HENSELCELLS_LOG_LEVEL"""
    env_file = Path('.env')
    if not env_file.exists():
        print("⚠️ No .env file, logging at the default level")
        return True

    from dotenv import dotenv_values
    values = dotenv_values(env_file)
    unused = sorted(k for k in values if k != 'HENSELCELLS_LOG_LEVEL')
    if unused:
        print(f"⚠️ .env sets {', '.join(unused)}, which henselcells ignores")
    level = values.get('HENSELCELLS_LOG_LEVEL')
    if level and level.upper() not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
        print(f"❌ HENSELCELLS_LOG_LEVEL={level} is not a logging level")
        return False
    print("✅ .env file configured")
    return True


def check_library():
    """Run one small computation end to end"""
    try:
        from cli.commands import CommandProcessor

        result = CommandProcessor(["index", "--prime", "2", "--n", "2"]).run()
        if result['success'] and result['output'] == "8":
            print("✅ cellprep index --prime 2 --n 2 -> 8")
            return True
        print(f"❌ Unexpected result: {result}")
        return False
    except Exception as e:
        print(f"❌ Library error: {e}")
        return False


def main():
    """Run setup validation"""
    print("🧮 henselcells - Setup Validation")
    print("=" * 50)

    checks = [
        ("Python Version", check_python_version),
        ("Dependencies", check_dependencies),
        ("Environment File", check_env_file),
        ("Library", check_library),
    ]

    passed = 0
    total = len(checks)

    for name, check_func in checks:
        print(f"\n📋 Checking {name}...")
        if check_func():
            passed += 1

    print("\n" + "=" * 50)
    print(f"📊 Setup Status: {passed}/{total} checks passed")

    if passed == total:
        print("🎉 Setup complete!")
        print("\n🚀 Try:")
        print('   python cellprep.py zeta --prime 5 "t"')
    else:
        print("❌ Setup incomplete. Please fix the issues above.")
        print("\n🔧 Quick setup:")
        print("1. Install dependencies: pip install -r requirements.txt")
        print("2. Run setup again: python setup.py")


if __name__ == "__main__":
    main()
