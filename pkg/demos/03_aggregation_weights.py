"""
Aggregation weights
===================

Five ways a gateway can weigh the models its satellites bring back.  Small
shards train many epochs and end with low loss; the schemes disagree on how
much that should count.
"""

import numpy as np
from leohfl.aggregation import (AggregatorConfig, ClientReport, ParamVector, Scheme,
                                global_weights, subregion_weights)

v = ParamVector(np.zeros(1), "demo")
# (samples, epochs, final loss) for four satellites under one gateway
reports = [ClientReport(v, d, k, loss) for d, k, loss in
           [(343, 4, 0.021), (93, 16, 0.015), (18, 85, 0.006), (215, 6, 0.019)]]

for scheme in Scheme:
    w = subregion_weights(reports, AggregatorConfig(scheme, beta=0.5, kappa=0.5))
    print(f"{scheme.label:8s}", np.round(w, 3))

# beta slides between the data-epoch share (beta=1) and the loss share (beta=0).
for beta in (0.0, 0.25, 0.5, 0.75, 1.0):
    print(f"beta={beta:.2f}", np.round(subregion_weights(reports, AggregatorConfig("fedsel", beta)), 3))

# The cloud weighs gateways by their total D*K^kappa.
print("cloud:", np.round(global_weights([reports[:2], reports[2:]], kappa=0.5), 3))
