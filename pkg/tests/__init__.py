# Tests for cubic_siegel package
