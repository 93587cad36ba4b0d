import hypothesis

# Numeric property tests do real linear algebra; wall-clock deadlines only
# produce flaky CI, so they are disabled for the whole suite.
hypothesis.settings.register_profile("numeric", deadline=None, max_examples=50)
hypothesis.settings.load_profile("numeric")
