# Integration tolerances
PAINLEVE_TOL = 1e-10
EPS_ODE_TOL = 1e-9
MAX_STEP = 0.05
MIN_STEP = 1e-14

# Integrator step control (PI controller, Hairer's DOPRI5 constants)
STEP_SAFETY = 0.9
STEP_ALPHA = 0.17
STEP_BETA = 0.04
STEP_MIN_FACTOR = 0.2
STEP_MAX_FACTOR = 10.0
MAX_STEPS = 2_000_000

# Equilibrium census
BIFURCATION_GUARD = 1e-8

# Validity windows: margin >= 10 counts as "much greater than one"
VALIDITY_MARGIN = 10.0
VALIDITY_RIGHT_MAX = 0.1

# Painleve layer
SEED_ABSCISSA = -40.0
SEED_ABSCISSA_MAX = -10.0
PLUS_FIT_WINDOW = (15.0, 40.0)
MINUS_FIT_WINDOW = (-40.0, -20.0)
DECAY_THRESHOLD_FACTOR = 0.05
ESCAPE_FACTOR = 0.5
MIN_FIT_PERIODS = 8

# Fits
FIT_TOL = 1e-9
FIT_MAX_ITER = 50
UNIDENTIFIABLE_AMPLITUDE = 1e-12

# Connection formulas
SPECIAL_PHASE_TOL = 1e-12
MAX_EXP_ARGUMENT = 700.0

# Capture detection
CAPTURE_FACTOR = 0.5
CAPTURE_WINDOW = 0.5

# Post-capture fit window
POST_FIT_WINDOW = (0.5, 1.5)

# Phase portraits
PORTRAIT_GRID = 600
PORTRAIT_BOX = 2.2
PORTRAIT_LEVELS = 24
PORTRAIT_TIMES = (-2.0, 0.0, 2.0)

# Canonical trajectory-figure runs
FIGURE_EPS = 0.01
FIGURE_THETA0 = (-2.0, -2.01)
FIGURE_THETA1 = 1.0
FIGURE_PHI0 = 0.02 + 0.0j

# CSV number format: 17 significant digits
CSV_FORMAT = "%.17g"
