"""Test-environment compatibility shims."""

import unittest

if not hasattr(unittest.TestCase, "enterClassContext"):
    # Backport of unittest.TestCase.enterClassContext (Python 3.11+).
    def _enter_class_context(cls, cm):  # type: ignore[no-untyped-def]
        cls_type = type(cm)
        enter = cls_type.__enter__
        exit_ = cls_type.__exit__
        result = enter(cm)
        cls.addClassCleanup(exit_, cm, None, None, None)
        return result

    unittest.TestCase.enterClassContext = classmethod(_enter_class_context)  # type: ignore[attr-defined]
