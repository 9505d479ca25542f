"""HTTP facade: pydantic schemas and the FastAPI application."""
