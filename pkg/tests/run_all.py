
import unittest, sys, os
# BITEXT_SKIP_SLOW=1 leaves out the 10k x 10k planted-pair recovery run
here = os.path.dirname(os.path.abspath(__file__))
loader = unittest.TestLoader()
suite = loader.discover(here, top_level_dir=os.path.dirname(here))
if os.getenv("BITEXT_SKIP_SLOW"):
    suite = unittest.TestSuite(t for t in suite if "test_acceptance" not in str(t))
runner = unittest.TextTestRunner(verbosity=2)
res = runner.run(suite)
sys.exit(0 if res.wasSuccessful() else 1)
