"""
Test script to verify Tropiscope installation
"""

import sys
import tempfile
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from utils.helpers import check_dependencies

def test_dependencies():
    """Test if all dependencies are installed"""
    print("🔍 Checking Dependencies...")
    print("-" * 40)
    
    deps = check_dependencies()
    all_good = True
    
    for dep, available in deps.items():
        status = "✅" if available else "❌"
        print(f"{status} {dep}")
        if not available:
            all_good = False
    
    print("-" * 40)
    if all_good:
        print("✅ All dependencies are installed!")
    else:
        print("❌ Some dependencies are missing. Run: pip install -r requirements.txt")
    
    return all_good

def test_directories():
    """Test if all required directories exist"""
    print("\n📁 Checking Directories...")
    print("-" * 40)
    
    required_dirs = [
        "config",
        "core",
        "algebra",
        "geometry",
        "polyhedra",
        "sampling",
        "limitset",
        "phase",
        "raster",
        "utils"
    ]
    
    all_good = True
    for directory in required_dirs:
        path = Path(directory)
        if path.exists():
            print(f"✅ {directory}")
        else:
            print(f"❌ {directory} (missing)")
            all_good = False
    
    print("-" * 40)
    if all_good:
        print("✅ All directories exist!")
    else:
        print("❌ Some directories are missing. Run setup.py")
    
    return all_good

def test_smoke_classification():
    """Classify the line 1 + z1 + z2 on a small sample"""
    print("\n📐 Classifying the line 1 + z1 + z2...")
    print("-" * 40)
    
    try:
        from core.config import RunConfig
        from core.pipeline import Tropiscope
        
        config = RunConfig(seed=1)
        config.variety.expression = "1+z1+z2"
        config.shells.points = 3000
        with tempfile.TemporaryDirectory() as out_dir:
            config.output.out_dir = out_dir
            verdict = Tropiscope(config).classify()
        print(f"Decision: {verdict.decision}")
        print(f"Dimension estimate: {verdict.dim_estimate}")
        slopes = [tuple(c["slopes"][0]) for c in verdict.cells if c["dim"] == 0 and c["slopes"]]
        print(f"Vertex slopes: {slopes}")
        return verdict.decision == "AlgebraicConsistent"
    except Exception as e:
        print(f"❌ Classification failed: {e}")
        return False

def main():
    """Run all tests"""
    print("🔭 Tropiscope Installation Test")
    print("=" * 50)
    
    # Run tests
    deps_ok = test_dependencies()
    dirs_ok = test_directories()
    smoke_ok = deps_ok and test_smoke_classification()
    
    # Final result
    print("\n" + "=" * 50)
    if deps_ok and dirs_ok:
        if smoke_ok:
            print("🎉 Tropiscope is ready to use!")
            print("Run: python main.py classify --expr '1+z1+z2' --seed 1")
        else:
            print("⚠️  Tropiscope is installed but the smoke classification was not AlgebraicConsistent")
            print("Check logs/tropiscope.log")
    else:
        print("❌ Tropiscope setup incomplete")
        print("Please fix the issues above and try again")

if __name__ == "__main__":
    main()
