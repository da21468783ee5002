from utils import resource_path

TEMPLATE_CONFIG_PATH = resource_path('config/cipwave_config.json')
VERSION_PATH = resource_path('version.json')

EXAMPLES = ("ex1", "ex2")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
