"""
Configuration settings for eit-nsim
- Level structure: 87Rb D2 line (5S1/2 -> 5P3/2)
- Units: frequencies in MHz, fields in Gauss, velocities in m/s, times in microseconds
- Every default can be overridden from the environment (EITNSIM_*) or a .env file
"""
import os
from pathlib import Path

# Load environment variables from .env file
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass  # dotenv not installed

# Base paths
BASE_DIR = Path(__file__).parent
RESULTS_DIR = BASE_DIR / "results"

CSV_FORMAT_TAG = "eit-nsim v1"

# Atomic constants (external reference data, not measured in the experiment being modelled)
GAMMA_MHZ = float(os.getenv("EITNSIM_GAMMA_MHZ", "6.0"))    # natural linewidth of 5P3/2
GROUND_HFS_MHZ = float(os.getenv("EITNSIM_GROUND_HFS_MHZ", "6834.682611"))
EXCITED_0_1_MHZ = float(os.getenv("EITNSIM_EXCITED_0_1_MHZ", "72.2180"))
EXCITED_1_2_MHZ = float(os.getenv("EITNSIM_EXCITED_1_2_MHZ", "156.9"))
EXCITED_2_3_MHZ = float(os.getenv("EITNSIM_EXCITED_2_3_MHZ", "266.6500"))
G_GROUND_F1 = float(os.getenv("EITNSIM_G_GROUND_F1", "-0.5"))
G_GROUND_F2 = float(os.getenv("EITNSIM_G_GROUND_F2", "0.5"))
G_EXCITED = float(os.getenv("EITNSIM_G_EXCITED", str(2 / 3)))  # F'=1,2,3 share 2/3
MU_B_MHZ_PER_G = 1.3996
I_SAT_MW_CM2 = float(os.getenv("EITNSIM_I_SAT", "1.67"))
WAVELENGTH_NM = float(os.getenv("EITNSIM_WAVELENGTH_NM", "780.241"))
ATOMIC_MASS_U = float(os.getenv("EITNSIM_ATOMIC_MASS_U", "86.909180527"))

# Experiment defaults
TEMPERATURE_C = float(os.getenv("EITNSIM_TEMPERATURE_C", "27.0"))
INTENSITY_LASER1 = float(os.getenv("EITNSIM_INTENSITY_LASER1", "20.0"))    # mW/cm^2
INTENSITY_LASER2 = float(os.getenv("EITNSIM_INTENSITY_LASER2", "30.0"))
LASER_LINEWIDTH_MHZ = float(os.getenv("EITNSIM_LASER_LINEWIDTH_MHZ", "1.0"))
GENERATOR_FREQUENCY_MHZ = float(os.getenv("EITNSIM_GENERATOR_FREQUENCY_MHZ", "156.9"))
SIDEBAND_INTENSITY_RATIO = float(os.getenv("EITNSIM_SIDEBAND_RATIO", "0.1"))
LAB_FIELD_G = float(os.getenv("EITNSIM_LAB_FIELD_G", "0.7"))
BASELINE_ABSORBED_FRACTION = float(os.getenv("EITNSIM_BASELINE_FRACTION", "0.10"))

# Relaxation
GAMMA_TRANSIT_MHZ = float(os.getenv("EITNSIM_GAMMA_TRANSIT_MHZ", "0.01"))
GAMMA_LASER_MHZ = float(os.getenv("EITNSIM_GAMMA_LASER_MHZ", str(LASER_LINEWIDTH_MHZ)))

# Doppler quadrature
N_VELOCITY = int(os.getenv("EITNSIM_N_VELOCITY", "64"))
VELOCITY_RULE = os.getenv("EITNSIM_VELOCITY_RULE", "gauss-hermite")         # or "uniform"
VELOCITY_SPAN_SIGMA = float(os.getenv("EITNSIM_VELOCITY_SPAN_SIGMA", "5.0"))  # uniform rule covers +-span*sigma
SCENARIO_N_VELOCITY = int(os.getenv("EITNSIM_SCENARIO_N_VELOCITY", "2048"))   # full-figure presets, uniform rule
ZOOM_N_VELOCITY = int(os.getenv("EITNSIM_ZOOM_N_VELOCITY", "256"))           # 24-level zoom windows, uniform rule
VELOCITY_BATCH_MB = int(os.getenv("EITNSIM_VELOCITY_BATCH_MB", "256"))       # memory cap of one stacked solve

# Solver tolerances
STEADY_STATE_RESIDUAL = float(os.getenv("EITNSIM_STEADY_STATE_RESIDUAL", "1e-10"))
HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-8
PROPAGATION_RTOL = float(os.getenv("EITNSIM_PROPAGATION_RTOL", "1e-9"))
PROPAGATION_TRACE_DRIFT = 1e-8
STATIC_PROPAGATION_METHOD = os.getenv("EITNSIM_STATIC_PROPAGATION_METHOD", "Radau")
PERIODIC_PROPAGATION_METHOD = os.getenv("EITNSIM_PERIODIC_PROPAGATION_METHOD", "DOP853")
PERIODICITY_TOL = float(os.getenv("EITNSIM_PERIODICITY_TOL", "1e-8"))
EIGENVALUE_GAP = 1e-6
PERIOD_SAMPLES = int(os.getenv("EITNSIM_PERIOD_SAMPLES", "32"))
FRAME_MATCH_MHZ = 1e-6    # two rotation frequencies closer than this are the same frame

# Feature detection
SMOOTHING_LINEWIDTHS = 5.0            # half-width of the dip envelope window, natural linewidths
DIP_MIN_CONTRAST = float(os.getenv("EITNSIM_DIP_MIN_CONTRAST", "0.002"))
PEAK_MIN_PROMINENCE = float(os.getenv("EITNSIM_PEAK_MIN_PROMINENCE", "0.05"))   # fraction of the dip-bridged span
MIN_POINTS_PER_FEATURE = 5

# Execution
THREADS = int(os.getenv("EITNSIM_THREADS", "1"))
VERBOSE = os.getenv("EITNSIM_VERBOSE", "0").strip().lower() in ("1", "true", "yes")
