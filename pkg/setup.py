"""
Setup script for Tropiscope
Helps with initial setup and dependency checking
"""

import sys
import subprocess
from pathlib import Path

def check_python_version():
    """Check if Python version is compatible"""
    if sys.version_info < (3, 9):
        print("❌ Python 3.9 or higher is required")
        return False
    print(f"✅ Python {sys.version.split()[0]} detected")
    return True

def install_dependencies():
    """Install required dependencies"""
    print("Installing dependencies...")
    
    try:
        subprocess.check_call([sys.executable, "-m", "pip", "install", "-r", "requirements.txt"])
        print("✅ Dependencies installed successfully")
        return True
    except subprocess.CalledProcessError as e:
        print(f"❌ Failed to install dependencies: {e}")
        return False

def create_directories():
    """Create necessary directories"""
    directories = [
        "config",
        "logs",
        "results"
    ]
    
    for directory in directories:
        Path(directory).mkdir(parents=True, exist_ok=True)
        print(f"✅ Created directory: {directory}")

def usage_instructions():
    """Show the subcommands and a first run"""
    print("\n" + "="*60)
    print("📐 USAGE")
    print("="*60)
    print("Every subcommand reads config/config.json style JSON and flags:")
    print()
    print("  python main.py classify --expr '1+z1+z2' --seed 1")
    print("  python main.py limitset --expr 'z1*z2 - 1' --seed 1")
    print("  python main.py phase    --expr 'z1*z2 - 1' --seed 1")
    print("  python main.py render   --expr '1+z1+z2' --seed 1")
    print("  python main.py certify  --config config/config_template.json")
    print()
    print("classify exits 0 (AlgebraicConsistent), 10 (NotAlgebraic) or 20 (Inconclusive).")
    print("Results are written to results/ unless --out says otherwise.")
    print("="*60)

def main():
    """Main setup function"""
    print("🔭 Tropiscope Setup")
    print("="*30)
    
    # Check Python version
    if not check_python_version():
        return
    
    # Create directories
    create_directories()
    
    # Install dependencies
    if not install_dependencies():
        print("Setup failed. Please install dependencies manually.")
        return
    
    usage_instructions()
    
    print("\n✅ Setup completed!")
    print("\nNext steps:")
    print("1. Run: python test_installation.py")
    print("2. Run: python main.py classify --expr '1+z1+z2' --seed 1")

if __name__ == "__main__":
    main()
