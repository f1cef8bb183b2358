from . import basis, correlator, curve, green, kernel, periods, selftest

COMMANDS = (curve, kernel, basis, periods, correlator, green, selftest)
