"""Named sweeps reproducing the evaluation figures.

Each preset is a config document, so ``preset = "fig3"`` in a user file
and ``hetsec fig3`` go through the same parser.
"""

PRESETS = {
    # IC macro cell on the direct gain set used for the bound comparison
    "fig2": """
[sweep]
axis = "gamma_M_dB"
values = [30, 35, 40, 45, 50, 55, 60]
schemes = ["IC"]
methods = "both"
combiner = "product"
mc_samples = 10000000
seed = 2

[gains]
Mm = 1.0
Ms = 1.0
Ss = 1.0
Sm = 0.2
Me = 1.0
Se = 1.0
""",
    # overall SOP (product) against SNR
    "fig3": """
[sweep]
axis = "gamma_M_dB"
values = [40, 50, 60, 70, 80, 90, 100, 110, 120, 130, 140, 150, 160]
schemes = ["OSS", "IL", "IC"]
methods = "both"
combiner = "product"
mc_samples = 1000000
seed = 3
""",
    # overall SOP (product) against the common secrecy rate
    "fig4": """
[sweep]
axis = "secrecy_rate"
values = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0]
schemes = ["OSS", "IL", "IC"]
methods = "both"
combiner = "product"
mc_samples = 1000000
seed = 4
""",
    # mean of the two cells' SOPs against SNR
    "fig5": """
[sweep]
axis = "gamma_M_dB"
values = [80, 90, 100, 110, 120, 130, 140, 150, 160]
schemes = ["OSS", "IL", "IC"]
methods = "both"
combiner = "mean"
mc_samples = 1000000
seed = 5
""",
    # mean of the two cells' SOPs against the common secrecy rate
    "fig6": """
[sweep]
axis = "secrecy_rate"
values = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0]
schemes = ["OSS", "IL", "IC"]
methods = "both"
combiner = "mean"
mc_samples = 1000000
seed = 6
""",
}
