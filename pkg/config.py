import os

# Get the absolute path of the project root
basedir = os.path.abspath(os.path.dirname(__file__))

class Config:
    """Base configuration class"""
    # Flask settings
    SECRET_KEY = os.environ.get('SECRET_KEY') or 'dev-secret-key-change-in-production'
    MAX_CONTENT_LENGTH = 5 * 1024 * 1024  # 5MB instance files

    # Logging
    LOG_FOLDER = os.path.join(basedir, 'logs')
    LOG_FILE = 'cdplan.log'

    # Enumeration limits
    ENUMERATION_BOUND = 9  # max leaves for explicit order enumeration
    BRUTEFORCE_BOUND = 3628800  # 10! rotation assignments per search, CDPLAN_CAPACITY overrides
    EMBEDDING_TREE_ORACLE_EDGES = 8

    # Generator settings
    GENERATOR_RETRIES = 200
    GENERATOR_MAX_VERTICES = 200  # largest n accepted by the HTTP generator

    # Background solving
    MAX_CONCURRENT_TASKS = 3
    TASK_MAX_AGE_HOURS = 24

    @staticmethod
    def init_app(app):
        """Initialize application with config"""
        capacity = os.environ.get('CDPLAN_CAPACITY')
        if capacity:
            try:
                app.config['BRUTEFORCE_BOUND'] = int(capacity)
            except ValueError:
                app.logger.warning(f"Ignoring invalid CDPLAN_CAPACITY value: {capacity!r}")

class DevelopmentConfig(Config):
    """Development configuration"""
    DEBUG = True
    TESTING = False

class TestingConfig(Config):
    """Testing configuration"""
    DEBUG = False
    TESTING = True

class ProductionConfig(Config):
    """Production configuration"""
    DEBUG = False
    TESTING = False

config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'production': ProductionConfig,
    'default': DevelopmentConfig
}
