# Routes package initialization
