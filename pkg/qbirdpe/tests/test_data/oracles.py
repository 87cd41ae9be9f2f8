from qbirdpe.gwsignal.likelihood import FunctionOracle


def _peaked(values, width=1.0):
    return -((values["x"] - 3) ** 2 + (values.get("y", 4.0) - 4) ** 2) / (2 * width**2)


flat_oracle = FunctionOracle(lambda values: 0.0)
# Gaussian bump at (3, 4) with unit width
peaked_oracle = FunctionOracle(_peaked)
# narrow enough that every downhill acceptance rounds to zero on a 3-qubit ancilla
sharp_oracle = FunctionOracle(lambda values: _peaked(values, width=0.1))
