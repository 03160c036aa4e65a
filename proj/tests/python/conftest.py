import os
import sys

# Under ctest, import the build-tree module even when an editable install
# has registered an import hook that would shadow it.
BUILD_TREE = os.environ.get("SWINGID_PYTHON_DIR")
if BUILD_TREE:
    sys.meta_path[:] = [f for f in sys.meta_path
                        if type(f).__name__ != "ScikitBuildRedirectingFinder"]
    sys.path.insert(0, BUILD_TREE)
