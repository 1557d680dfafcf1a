"""Configuration constants for the spin-wave memory simulator.

All angular frequencies are in rad/s, wavevectors in rad/mm and lengths in mm
unless the constant name says otherwise.
"""
import math

#Transverse modes
SIGMA_RAD_PER_MM = 10.3          # mode field radius in wavevector space
SIGMA_CLASSICAL_RAD_PER_MM = 6.8  # mode radius used for the coherent-state interference run
GRID_POINTS = 256                # sampled mode grid, points per axis
GRID_HALF_WIDTH_SIGMA = 8.0      # sampled grid half width in units of sigma

#Grating
GRATING_K_RAD_PER_MM = 90.0      # k_g used for the two-excitation interference (= Delta K_y)
FOURIER_SAMPLES = 4096           # samples per period for numerical Fourier coefficients
N_MAX = 10                       # default diffraction-order truncation
MIN_SAMPLED_POINTS = 16          # minimal samples per period of a SampledPattern
FIT_ALPHA = 23.1                 # cross-correlation fit amplitude
FIT_GAMMA_PER_RAD = 0.27         # exponential retrieval decay
TWO_TONE_RATIO = 2.5             # chi_1 / chi_2 of the steering pattern
BLAZED_INTENSITY_NOISE = 0.10    # relative intensity deviation of the blazed pattern
BLAZED_MEASURED_EFFICIENCY = 0.40  # comparison point only
CLASSICAL_HOM_MEASURED = 0.53     # comparison point only, includes noise absent from the model

#Photon counting
P_PAIR = 0.05                    # pair generation probability per mode
DARK_RATIO = 0.017               # p_dark / eta on read-out detectors
THERMAL_NBAR = 0.1               # thermal occupation of the unheralded mode in the HBT run
COHERENT_NBAR = 0.1              # mean occupation of each phase-averaged coherent input
MISALIGNMENT_SLOPE = 0.29        # residual wa/rc misalignment per unit Delta K_x

#Fock oracle
FOCK_CUTOFF = 8                  # photons per mode
FOCK_DENSE_LIMIT = 2_000_000     # largest dense amplitude tensor the oracle will build

#Coincidence camera
CAMERA_NX = 5                    # grid columns (k_x)
CAMERA_NY = 33                   # grid rows (k_y)
CAMERA_PITCH_RAD_PER_MM = 15.0   # pixel pitch; divides k_g six times
CAMERA_SHOTS = 1_000_000
CAMERA_P_PAIR = 0.01             # per-mode pair probability of the Monte Carlo map
CAMERA_ETA = 0.5                 # read-out detection efficiency of the camera
CAMERA_P_DARK = 1e-5             # dark click probability per camera pixel and shot
CAMERA_CHUNK = 20_000            # shots per vectorised chunk

#ac Stark model (Rb-87 D2 line)
DIPOLE_CM = 3.58e-29                         # transition dipole matrix element
A_HALF_RAD_PER_S = 2 * math.pi * 3.42e9      # A_{0,1/2}
A_THREE_HALF_RAD_PER_S = 2 * math.pi * 85e6  # A_{1,3/2}
STARK_DETUNING_RAD_PER_S = 2 * math.pi * 1.43e9
STARK_INTENSITY_MW_PER_CM2 = 35.0
STARK_TIME_S = 2e-6
POLE_GUARD_RAD_PER_S = 2 * math.pi * 1e6
FIELD_CONVENTION = 'rms'         # 'rms' or 'peak' field amplitude from intensity
GAMMA_SCATTER_HZ = 390.0
GAMMA_NOISE_HZ = 1e-3
ATOM_NUMBER = 1e8
REFERENCE_RABI_MHZ = (13.0, 10.1, 4.5, 5.8, 14.7)  # per-transition values, reference only

#Ensemble geometry
SIGMA_Z_MM = 4.0
SIGMA_PERP_MM = 0.3
K_READ_RAD_PER_MM = 7899.0
WAVELENGTH_NM = 795.0
PHASEMATCH_K_RAD_PER_MM = 44.0

#Multiplexed source (two parameter sets of the rate figure)
RATE_P = 1e-2
RATE_MODES = 4000
RATE_ETA_W = 0.2
RATE_ETA_R_A = 0.9 * 0.8
RATE_ETA_R_B = 0.5 * 0.24
RATE_REP_HZ = 1e3
RATE_L_MAX = 10

#Repeater
REPEATER_L0_KM = 10.0
REPEATER_L_ATT_KM = 22.0
REPEATER_ETA_CAM = 0.5
REPEATER_MODES = 4000
REPEATER_P = 1e-3
REPEATER_TRIALS = 100_000
MC_BLOCK_TRIALS = 10_000         # trials per independently seeded Monte Carlo block
MC_WORKERS = 4

DEFAULT_SEED = 20190618
