import json
import os
import random

# Directory to save the generated configuration files
CONFIG_DIR = os.path.join(os.path.dirname(__file__), 'sample_configs')

# Ensure the directory exists
os.makedirs(CONFIG_DIR, exist_ok=True)

# Parameter ranges that keep every run well inside the models' domains
GENERATORS = {
    'hom-dip': lambda: {
        'p_pair': round(random.uniform(0.005, 0.1), 4),
        'dark_ratio': round(random.uniform(0.0, 0.05), 4),
        'theta_rad': round(random.uniform(0, 3.14), 3),
        'points': random.randint(5, 21),
    },
    'hbt': lambda: {
        'p_pair': round(random.uniform(0.005, 0.1), 4),
        'thermal_nbar': round(random.uniform(0.01, 0.2), 3),
        'background_nbar': round(random.uniform(0.0, 0.2), 3),
        'cutoff': random.randint(6, 10),
        'points': random.randint(3, 9),
    },
    'rates': lambda: {
        'p_pair': round(random.uniform(0.001, 0.05), 4),
        'modes': random.choice([100, 500, 1000, 4000]),
        'eta_w': round(random.uniform(0.1, 0.9), 3),
        'l_max': random.randint(3, 10),
    },
    'repeater': lambda: {
        'l0_km': round(random.uniform(5, 50), 1),
        'p_pair': round(random.uniform(1e-4, 5e-3), 5),
        'trials': random.choice([1000, 5000, 10000]),
        'block_trials': 1000,
        'seed': random.randint(0, 2 ** 31 - 1),
    },
    'steered-diffraction': lambda: {
        'tone_ratio': round(random.uniform(1.2, 4.0), 2),
        'total_rms_rad': round(random.uniform(0.5, 1.5), 2),
        'points': random.randint(9, 37),
    },
}


def generate_config_file(filename, scenario):
    data = GENERATORS[scenario]()
    with open(os.path.join(CONFIG_DIR, filename), 'w') as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write('\n')


def main():
    for scenario in GENERATORS:
        filename = f'{scenario}_random.json'
        generate_config_file(filename, scenario)
    print(f"Generated {len(GENERATORS)} random configuration files in {CONFIG_DIR}")


if __name__ == '__main__':
    main()
