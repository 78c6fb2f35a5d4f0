"""HTTP layer: FastAPI app plus its pydantic wire schemas."""
